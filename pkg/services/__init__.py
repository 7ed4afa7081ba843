"""
Services package: one service class and module-level instance per concern
"""
