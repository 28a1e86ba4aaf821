import os
import sys

# When frozen, sys.executable is the binary path
# When running from source, use sys.argv[0]
if getattr(sys, "frozen", False):
    execute_dir = os.path.dirname(sys.executable)
else:
    execute_dir = os.path.split(os.path.realpath(sys.argv[0]))[0]

# Bundled read-only resources (config/) live next to the package.
bundle_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

__all__ = ["execute_dir", "bundle_dir"]
