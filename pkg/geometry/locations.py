from typing import Sequence, Union


def json_path(loc: Sequence[Union[int, str]]) -> str:
    """Render a pydantic error location as $.a[0].b."""
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in loc)
