def f():
    pass

def _private():
    pass
