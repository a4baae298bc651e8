def original():
    pass


def other():
    pass


def run(f):
    f = other
    f()


def main():
    run(original)


main()
