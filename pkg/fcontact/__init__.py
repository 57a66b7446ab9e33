from .fcontact import FContact
from .structures import FStructure, Level
from fcontact._version import __version__
