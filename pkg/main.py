# 命令行启动入口
# 用法：uv run python main.py run --scenario IV --attack DPDA（帮助信息中的程序名为 ringsim）

import sys

from src.ringsim.main import main

if __name__ == "__main__":
    sys.exit(main())
