# gr2/__init__.py
VERSION = "1.0.0"
