def pytest_collection_modifyitems(session, config, items):
    """Monkey patch tests' order."""

    def rank(a):
        return \
            2**1 * int("statistical" in a.keywords) + \
            2**0 * int("cli" in a.keywords)

    items.sort(key=rank)
