import json
import logging

from ballotree.utils.config import Config, get_config
from ballotree.utils.logger import setup_logging
from ballotree.utils.system import format_count, format_duration, resolve_jobs


class TestConfig:
    def test_defaults(self, tmp_path):
        config = Config(tmp_path)
        assert config.get("exhaustive_limit") == 8
        assert config.get("share_threshold") == 10_000
        assert config.exhaustive_limit == 8

    def test_file_overrides_defaults(self, tmp_path):
        (tmp_path / "config.json").write_text(json.dumps({"chunk_size": 128}))
        config = Config(tmp_path)
        assert config.get("chunk_size") == 128
        assert config.get("default_seed") == 0

    def test_unreadable_file_is_ignored(self, tmp_path):
        (tmp_path / "config.json").write_text("{not json")
        assert Config(tmp_path).get("chunk_size") == 65_536

    def test_set_persists(self, tmp_path):
        Config(tmp_path).set("random_shapes", 3)
        assert Config(tmp_path).get("random_shapes") == 3

    def test_reset(self, tmp_path):
        config = Config(tmp_path)
        config.set("default_seed", 9)
        config.reset()
        assert config.get_all() == Config.DEFAULTS

    def test_env_limit_wins(self, tmp_path, monkeypatch):
        monkeypatch.setenv("BALLOTREE_EXHAUSTIVE_LIMIT", "5")
        assert Config(tmp_path).exhaustive_limit == 5
        monkeypatch.setenv("BALLOTREE_EXHAUSTIVE_LIMIT", "many")
        assert Config(tmp_path).exhaustive_limit == 8

    def test_global_instance_uses_env_dir(self, tmp_path):
        assert get_config() is get_config()
        assert get_config().config_dir == tmp_path / "config"


class TestSystem:
    def test_resolve_jobs(self):
        assert resolve_jobs(3) == 3
        assert resolve_jobs(0) >= 1
        assert resolve_jobs(None) == resolve_jobs(0)

    def test_format_count(self):
        assert format_count(4_644_864) == "4,644,864"

    def test_format_duration(self):
        assert format_duration(0.25) == "250 ms"


def test_setup_logging_writes_file(tmp_path):
    setup_logging(tmp_path / "logs", "DEBUG")
    logging.getLogger("ballotree.test").info("hello")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "hello" in (tmp_path / "logs" / "ballotree.log").read_text()
