"""__init__.py file."""

from .manifold import PoincareDisk, ProductManifold  # noqa
from .optimizer import init_state, iterate, step  # noqa
