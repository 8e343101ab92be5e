"""INI-style configuration files.

Grammar (``configparser`` dialect): ``[section]`` headers, ``key = value``
lines, ``#`` or ``;`` comments.  Lists are comma separated.  Every key a
run needs must be present; a missing one raises :class:`ConfigError`
naming ``section.key``.
"""

from __future__ import annotations

import configparser
import math
import os
from importlib import resources

from ..errors import ConfigError


def default_config_path() -> str:
    return str(resources.files("maxharm.lab").joinpath("default.ini"))


class Config:
    def __init__(self, parser: configparser.ConfigParser, source: str = "<string>"):
        self._p = parser
        self.source = source

    @classmethod
    def read(cls, path) -> "Config":
        if not os.path.exists(path):
            raise ConfigError(f"config file {path} does not exist")
        p = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            p.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        return cls(p, str(path))

    @classmethod
    def from_string(cls, text: str) -> "Config":
        p = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            p.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config: {exc}") from exc
        return cls(p)

    def has(self, section: str, key: str | None = None) -> bool:
        if key is None:
            return self._p.has_section(section)
        return self._p.has_option(section, key)

    def raw(self, section: str, key: str) -> str:
        if not self._p.has_section(section):
            raise ConfigError(f"missing config section [{section}] (needed for {section}.{key})")
        if not self._p.has_option(section, key):
            raise ConfigError(f"missing config key {section}.{key}")
        return self._p.get(section, key).strip()

    def get(self, section: str, key: str, default=None) -> str:
        if default is not None and not self.has(section, key):
            return default
        return self.raw(section, key)

    def _convert(self, section, key, fn, what):
        text = self.raw(section, key)
        try:
            return fn(text)
        except ValueError as exc:
            raise ConfigError(f"{section}.{key} = {text!r} is not {what}") from exc

    def int(self, section: str, key: str) -> int:
        return self._convert(section, key, int, "an integer")

    def float(self, section: str, key: str) -> float:
        v = self._convert(section, key, float, "a number")
        if math.isnan(v):
            raise ConfigError(f"{section}.{key} is NaN")
        return v

    def floats(self, section: str, key: str) -> list[float]:
        return self._convert(section, key, lambda t: [float(x) for x in t.split(",") if x.strip()], "a number list")

    def ints(self, section: str, key: str) -> list[int]:
        return self._convert(section, key, lambda t: [int(x) for x in t.split(",") if x.strip()], "an integer list")

    def words(self, section: str, key: str) -> list[str]:
        return [w.strip() for w in self.raw(section, key).split(",") if w.strip()]

    def section(self, name: str) -> dict:
        if not self._p.has_section(name):
            raise ConfigError(f"missing config section [{name}]")
        return dict(self._p.items(name))
