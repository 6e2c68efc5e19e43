# gaussian_petz/db/db.py
import sqlite3
from contextlib import contextmanager

from gaussian_petz.utils.config import DB_PATH


def init_db(db_path=DB_PATH):
    conn = sqlite3.connect(db_path)
    c = conn.cursor()
    # One row per finished search run
    c.execute('''CREATE TABLE IF NOT EXISTS searches (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        seed INTEGER,
        samples INTEGER,
        modes INTEGER,
        found INTEGER,
        min_deficit REAL,
        near_singular INTEGER,
        failed INTEGER,
        evaluated INTEGER,
        created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
    )''')
    # The kept (most negative) records of a run
    c.execute('''CREATE TABLE IF NOT EXISTS search_records (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        search_id INTEGER,
        sample_index INTEGER,
        deficit REAL,
        record_json TEXT,
        FOREIGN KEY(search_id) REFERENCES searches(id)
    )''')
    conn.commit()
    conn.close()


@contextmanager
def get_db(db_path=DB_PATH):
    conn = sqlite3.connect(db_path)
    try:
        yield conn
    finally:
        conn.close()
