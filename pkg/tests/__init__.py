# tests/__init__.py - qednp unit tests, one module per package part
