def one():
    pass


def two():
    pass


FLAG = True


def main():
    f = one if FLAG else two
    f()


main()
