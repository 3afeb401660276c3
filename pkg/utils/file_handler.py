# -*- coding: utf-8 -*-

import hashlib
import json
import logging
import os
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

FLOAT_FORMAT = '%.17g'


def _ensure_parent(output_path: str):
    output_dir = os.path.dirname(output_path)
    if output_dir:
        os.makedirs(output_dir, exist_ok=True)


def save_data_to_json(data_to_save: Any, output_path: str):
    """
    将数据（列表或字典）以JSON格式保存到指定文件。
    会自动创建不存在的目录。
    """
    try:
        _ensure_parent(output_path)
        with open(output_path, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(data_to_save, f, indent=2, ensure_ascii=False)
            f.write('\n')
        logging.info(f"数据成功保存至: '{output_path}'")
    except Exception as e:
        logging.error(f"写入JSON文件 '{output_path}' 时发生错误: {e}", exc_info=True)
        raise


def save_rows_to_csv(rows: List[Dict[str, Any]], columns: Sequence[str], output_path: str):
    """按固定列顺序写 CSV；rows 为空时只写表头。浮点数保留 17 位有效数字，行尾为 LF。"""
    _ensure_parent(output_path)
    df = pd.DataFrame(rows, columns=list(columns))
    df.to_csv(output_path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    logging.info(f"CSV 已保存到: {output_path}（{len(df)} 行）")


def save_matrix(matrix: np.ndarray, output_path: str):
    """空白分隔的矩阵文本，NaN 原样写出。"""
    _ensure_parent(output_path)
    np.savetxt(output_path, np.atleast_2d(matrix), fmt=FLOAT_FORMAT, delimiter=' ', newline='\n')
    logging.info(f"矩阵已保存到: {output_path}（形状 {np.atleast_2d(matrix).shape}）")


def save_lines(lines: Sequence[str], output_path: str):
    _ensure_parent(output_path)
    with open(output_path, 'w', encoding='utf-8', newline='\n') as f:
        for line in lines:
            f.write(line + '\n')
    logging.info(f"文本已保存到: {output_path}")


def sha256_of_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()
