"""Write a deterministic synthetic Solidity project large enough for the
null-model and removal experiments (function backbone component >= 50).

Every function makes one light call to a shared Core contract and
repeated calls to two randomly chosen modules. Functions that share a
module end up strongly tied after projection, while the Core links give
each function a high degree, so the strong ties survive the backbone
filter and form a large random-intersection component.
"""

import argparse
import random
from pathlib import Path

HEADER = ["// SPDX-License-Identifier: MIT", "pragma solidity ^0.8.0;", ""]


def render_core() -> str:
    return "\n".join(HEADER + [
        "contract Core {",
        "    uint256 public ticks;",
        "",
        "    function tick() external {",
        "        ticks += 1;",
        "    }",
        "}",
        "",
    ])


def render_module(i: int, n_modules: int, n_funcs: int, rng: random.Random) -> str:
    peers = set()
    body = []
    for f in range(n_funcs):
        targets = rng.sample([j for j in range(n_modules) if j != i], 2)
        stmts = ["        core.tick();"]
        for t in targets:
            peers.add(t)
            for _ in range(rng.randint(2, 4)):
                stmts.append(f"        peer{t:02d}.poke(x);")
        if rng.random() < 0.15:
            stmts.append("        (bool ok, ) = msg.sender.call{value: 0}(\"\");")
            stmts.append("        require(ok, \"call failed\");")
        body += [f"    function step{f}(uint256 x) public {{"] + stmts + ["    }", ""]
    body += ["    function poke(uint256 x) external {", "        counter += x;", "    }"]
    lines = HEADER + ['import "./Core.sol";'] + [f'import "./Module{t:02d}.sol";' for t in sorted(peers)]
    lines += ["", f"contract Module{i:02d} {{", "    uint256 public counter;", "    Core public core;"]
    lines += [f"    Module{t:02d} public peer{t:02d};" for t in sorted(peers)]
    lines += [""] + body + ["}", ""]
    return "\n".join(lines)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", type=Path)
    ap.add_argument("--modules", type=int, default=24)
    ap.add_argument("--functions", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "Core.sol").write_text(render_core(), encoding="utf-8")
    for i in range(args.modules):
        text = render_module(i, args.modules, args.functions, rng)
        (args.out / f"Module{i:02d}.sol").write_text(text, encoding="utf-8")


if __name__ == "__main__":
    main()
