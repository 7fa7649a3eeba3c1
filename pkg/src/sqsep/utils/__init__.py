"""Package for sqsep utils."""

from .utils import *
