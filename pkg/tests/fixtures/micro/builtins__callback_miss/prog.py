def key_fn(x):
    return x


def main():
    xs = [3, 1, 2]
    sorted(xs, key=key_fn)


main()
