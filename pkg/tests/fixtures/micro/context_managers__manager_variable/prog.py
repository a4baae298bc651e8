class CM:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        pass


def body():
    pass


def main():
    manager = CM()
    with manager:
        body()


main()
