class A:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        pass

    def x(self):
        pass


class B:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        pass

    def y(self):
        pass


def main():
    with A() as a, B() as b:
        a.x()
        b.y()


main()
