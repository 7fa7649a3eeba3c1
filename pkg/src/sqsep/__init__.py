"Package for sqsep."

from importlib.metadata import version, PackageNotFoundError

try:
    __version__ = version("sqsep")
except PackageNotFoundError:
    __version__ = "0.1.0"  # fallback
