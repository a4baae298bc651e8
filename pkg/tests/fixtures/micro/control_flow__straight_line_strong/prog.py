class A:
    def m(self):
        pass


class B:
    def m(self):
        pass


def main():
    x = A()
    x = B()
    x.m()


main()
