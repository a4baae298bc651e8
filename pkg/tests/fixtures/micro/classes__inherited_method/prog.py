class Base:
    def collect(self):
        pass


class Sub(Base):
    pass


def main():
    Sub().collect()


main()
