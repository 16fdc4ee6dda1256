"""Тесты maxop."""
