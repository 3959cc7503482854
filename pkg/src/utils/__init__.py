from .file_utils import ensure_columns, read_json_config, safe_read_csv, write_json, write_table

__all__ = ['ensure_columns', 'read_json_config', 'safe_read_csv', 'write_json', 'write_table']
