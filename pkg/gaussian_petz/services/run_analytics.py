# gaussian_petz/services/run_analytics.py
import json

import numpy as np

from gaussian_petz.utils import config
from gaussian_petz.utils.logging_utils import log_manager


class RunAnalytics:
    def __init__(self, get_db, colors=None):
        self.get_db = get_db
        self.colors = colors

    def summarize(self, result, threshold=config.COUNTEREXAMPLE_THRESHOLD):
        """Statistics over the kept records of a SearchResult."""
        deficits = np.array([r.deficit for r in result.records], dtype=float)
        kinds = {}
        for r in result.records:
            kinds[r.channel["kind"]] = kinds.get(r.channel["kind"], 0) + 1
        summary = {
            "evaluated": result.evaluated,
            "near_singular": result.near_singular,
            "failed": result.failed,
            "found": result.found,
            "hit_rate": result.found / result.evaluated if result.evaluated else 0.0,
            "kept": int(deficits.size),
            "kept_below_threshold": int(np.sum(deficits < threshold)),
            "min_deficit": float(deficits.min()) if deficits.size else None,
            "median_kept_deficit": float(np.median(deficits)) if deficits.size else None,
            "channel_kinds": kinds,
        }
        log_manager(f"{summary['found']} of {summary['evaluated']} evaluated samples below {threshold:g} "
                    f"(hit rate {summary['hit_rate']:.4f})", colors=self.colors, level="INFO",
                    prefix="[ANALYTICS] ")
        return summary

    def save_search(self, result):
        """Archive a finished search; returns the new searches.id."""
        with self.get_db() as conn:
            c = conn.cursor()
            c.execute(
                "INSERT INTO searches (seed, samples, modes, found, min_deficit, near_singular, failed, evaluated) "
                "VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                (result.seed, result.samples, result.modes, result.found, result.min_deficit,
                 result.near_singular, result.failed, result.evaluated)
            )
            search_id = c.lastrowid
            c.executemany(
                "INSERT INTO search_records (search_id, sample_index, deficit, record_json) VALUES (?, ?, ?, ?)",
                [(search_id, r.index, r.deficit, json.dumps(r.to_json())) for r in result.records]
            )
            conn.commit()
        log_manager(f"Archived search {search_id} with {len(result.records)} record(s)",
                    colors=self.colors, level="SUCCESS", prefix="[ANALYTICS] ")
        return search_id
