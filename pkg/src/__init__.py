# deckit - 装饰等式逻辑的证明核、有限模型与命令行工具

__version__ = "0.3.0"
