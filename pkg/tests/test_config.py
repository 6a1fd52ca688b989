"""
Unit tests for the configuration module
Location: tests/test_config.py
"""

import config


def test_corpus_files_are_present():
    assert config.validate_configuration() is True
    assert config.get_data_file_path("octagon.hts") == config.OCTAGON_FILE
    assert config.OCTAGON_FILE.exists()


def test_config_summary():
    summary = config.get_config_summary()
    assert summary["exact_tolerance"] == config.TOLERANCE_CONFIG["exact"]
    assert summary["default_seed"] == config.CLI_CONFIG["default_seed"]
    assert summary["data_directory"].endswith("data")


def test_ensure_directories_exist(tmp_path, monkeypatch):
    monkeypatch.setattr(config, "LOGS_DIR", tmp_path / "logs")
    monkeypatch.setattr(config, "DATA_DIR", tmp_path / "data")
    config.ensure_directories_exist()
    assert (tmp_path / "logs").is_dir()
    assert (tmp_path / "data").is_dir()
