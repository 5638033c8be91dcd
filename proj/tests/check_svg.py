"""Parses every SVG under a directory with a strict XML parser."""

import pathlib
import sys
import xml.etree.ElementTree as ET

root = pathlib.Path(sys.argv[1])
svgs = sorted(root.rglob("*.svg"))
if not svgs:
    sys.exit(f"no SVG files under {root}")
for path in svgs:
    tree = ET.parse(path)
    if tree.getroot().tag != "{http://www.w3.org/2000/svg}svg":
        sys.exit(f"{path}: root element is {tree.getroot().tag}")
print(f"{len(svgs)} SVG files parsed")
