class A:
    def m(self):
        pass


class B:
    def m(self):
        pass


FLAG = True


def main():
    if FLAG:
        x = A()
    else:
        x = B()
    x.m()


main()
