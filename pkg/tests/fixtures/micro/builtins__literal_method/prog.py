def main():
    parts = 'tel-num'.split('-')


main()
