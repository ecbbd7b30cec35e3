import json
import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv(override=False)

LANG = os.getenv("GTLAB_LANG", "en")

BASE_DIR = Path(__file__).parent
LANG_FILE = BASE_DIR / f"{LANG}.json"
if not LANG_FILE.exists():
    LANG_FILE = BASE_DIR / "en.json"

with open(LANG_FILE, "r", encoding="utf-8") as f:
    _MESSAGES = json.load(f)


class _Params(dict):
    def __missing__(self, key):
        return "{" + key + "}"


def msg(key: str, **params) -> str:
    template = _MESSAGES.get(key)
    if template is None:
        return f"[{key}] {params}" if params else f"[{key}]"
    return template.format_map(_Params(params))


def error_text(err) -> str:
    """Localized text for a LabError."""
    return msg(err.key, **err.params)
# ---------------- END OF FILE ----------------
