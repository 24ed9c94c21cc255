"""tailbound：以尾部能量界限逐層剪枝的精確 kNN refinement 引擎。"""

__version__ = "0.1.0"
