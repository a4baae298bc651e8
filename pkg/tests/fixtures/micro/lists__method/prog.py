def main():
    xs = []
    xs.append(1)
    xs.sort()


main()
