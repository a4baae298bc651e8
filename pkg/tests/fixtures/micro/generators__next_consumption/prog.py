def payload():
    pass


def gen():
    payload()
    yield 1


def main():
    g = gen()
    next(g)


main()
