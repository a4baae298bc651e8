def cb():
    pass


def main():
    xs = [cb]
    xs[0]()


main()
