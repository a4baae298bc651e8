def c():
    pass


def b():
    c()


def a():
    b()


def main():
    a()


main()
