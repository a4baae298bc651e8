from .impl import api
