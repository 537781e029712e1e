"""Frontend Utilities Module

Utilities:
    - error_handler: diagnostics and the persisted error log
"""
