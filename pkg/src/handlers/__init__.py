# Handlers Package

from .handler_manager import HandlerManager

__all__ = ['HandlerManager']
