import logging
import os
import time

from utils.logger import cleanup_old_logs, get_logger, setup_logger


def _gdr_handlers():
    return [h for h in logging.getLogger().handlers if getattr(h, "_gdr_handler", False)]


def test_setup_replaces_its_own_handlers(tmp_path):
    setup_logger(logging.DEBUG, log_dir=tmp_path, to_file=True)
    setup_logger(logging.DEBUG, log_dir=tmp_path, to_file=True)
    assert len(_gdr_handlers()) == 2

    get_logger("gdr.test").info("hello")
    for handler in _gdr_handlers():
        handler.flush()
    assert "| INFO     | gdr.test | hello" in (tmp_path / "gdr.log").read_text(encoding="utf-8")

    setup_logger(logging.WARNING, to_file=False)
    assert len(_gdr_handlers()) == 1


def test_cleanup_removes_only_old_logs(tmp_path):
    old = tmp_path / "gdr.log.1"
    fresh = tmp_path / "gdr.log"
    old.write_text("old", encoding="utf-8")
    fresh.write_text("fresh", encoding="utf-8")
    stale = time.time() - 10 * 86400
    os.utime(old, (stale, stale))

    cleanup_old_logs(days=7, log_dir=tmp_path)
    assert not old.exists()
    assert fresh.exists()
    # A missing directory is not an error
    cleanup_old_logs(log_dir=tmp_path / "absent")
