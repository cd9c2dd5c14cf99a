#!/usr/bin/env python3
# Regenerates include/sfe/tdesign_data.hpp from data/tdesign/*.txt.
import pathlib, re

root = pathlib.Path(__file__).resolve().parent.parent
files = sorted((root / "data" / "tdesign").glob("t*_*.txt"),
               key=lambda p: int(re.match(r"t(\d+)_", p.name).group(1)))

lic = (root / "tools" / "license_header.txt").read_text().rstrip("\n").splitlines()
out = lic + ["", "// Generated by tools/gen_tdesign_header.py. Do not edit.",
       "#pragma once", "", "#include <array>", "#include <span>", "",
       "namespace sfe::detail {", ""]
entries = []
for f in files:
    t = int(re.match(r"t(\d+)_", f.name).group(1))
    rows = [l.split() for l in f.read_text().splitlines() if l.strip()]
    out.append(f"inline constexpr double kDesign{t}[][3] = {{")
    for r in rows:
        out.append("    {" + ", ".join(r) + "},")
    out.append("};")
    out.append("")
    entries.append((t, len(rows)))

out.append("struct DesignEntry {")
out.append("  int t;")
out.append("  std::span<const double[3]> points;")
out.append("};")
out.append("")
out.append(f"inline constexpr std::array<DesignEntry, {len(entries)}> kDesigns = {{{{")
for t, n in entries:
    out.append(f"    {{{t}, std::span<const double[3]>(kDesign{t}, {n})}},")
out.append("}};")
out.append("")
out.append("}  // namespace sfe::detail")
(root / "include" / "sfe" / "tdesign_data.hpp").write_text("\n".join(out) + "\n")
