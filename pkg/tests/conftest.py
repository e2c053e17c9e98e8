import jumpchain.exact


def pytest_configure(config):
    # every apply_pi on a full-support input asserts the sandwich bound
    jumpchain.exact.SANDWICH_CHECK = True
