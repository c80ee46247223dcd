# 扫描任务模块
# 负责实验网格的展开与线程池并行执行
