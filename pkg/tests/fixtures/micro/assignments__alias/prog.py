def target():
    pass


def main():
    g = target
    g()


main()
