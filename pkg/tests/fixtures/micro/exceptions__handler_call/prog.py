def risky():
    raise ValueError('boom')


def recover():
    pass


def main():
    try:
        risky()
    except ValueError:
        recover()


main()
