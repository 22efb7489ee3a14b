import os
import sys

# run against the freshly built extension without installing the wheel
_mod_dir = os.environ.get("TSGAD_MODULE_DIR")
_pkg_dir = os.environ.get("TSGAD_PKG_DIR")
if _mod_dir:
    sys.path.insert(0, _mod_dir)
if _pkg_dir:
    sys.path.insert(0, _pkg_dir)
