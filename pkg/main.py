#!/usr/bin/env python3
"""deckit 主入口。

与安装后的 `deckit` 命令相同，转发到 src.cli 中的 click 命令组。
"""

from src.cli import cli

if __name__ == "__main__":
    cli()
