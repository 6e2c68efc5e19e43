# gaussian_petz/services/search_service.py
import heapq
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor, as_completed
from dataclasses import dataclass

from scipy import linalg

from gaussian_petz.core.info_measures import recovery_deficit
from gaussian_petz.core.sampling import instance_rng, random_faithful_instance
from gaussian_petz.utils import config
from gaussian_petz.utils.errors import ConfigurationError, GaussianPetzError, NonFaithfulError, SearchAbortedError
from gaussian_petz.utils.logging_utils import log_manager
from gaussian_petz.utils.record_bus import RecordBus

EXECUTORS = {"process": ProcessPoolExecutor, "thread": ThreadPoolExecutor}


@dataclass(frozen=True)
class SearchRecord:
    seed: int
    index: int
    deficit: float
    d_in: float
    d_out: float
    d_recovery: float
    channel: dict
    instance: dict

    def sort_key(self):
        return (self.deficit, self.index)

    def to_json(self):
        return {
            "seed": self.seed,
            "index": self.index,
            "deficit": self.deficit,
            "d_in": self.d_in,
            "d_out": self.d_out,
            "d_recovery": self.d_recovery,
            "channel_kind": self.channel,
            "instance": self.instance,
        }


@dataclass
class SearchResult:
    seed: int
    samples: int
    modes: int
    evaluated: int
    near_singular: int
    failed: int
    found: int
    min_deficit: float
    records: list

    def to_json(self):
        return {
            "seed": self.seed,
            "samples": self.samples,
            "modes": self.modes,
            "evaluated": self.evaluated,
            "near_singular": self.near_singular,
            "failed": self.failed,
            "found": self.found,
            "min_deficit": self.min_deficit,
            "records": [r.to_json() for r in self.records],
        }


def _chunks(samples, workers):
    """Contiguous [start, stop) ranges covering range(samples)."""
    workers = max(1, min(workers, samples)) if samples else 1
    base, extra = divmod(samples, workers)
    start = 0
    out = []
    for w in range(workers):
        stop = start + base + (1 if w < extra else 0)
        out.append((start, stop))
        start = stop
    return out


def evaluate_sample(seed, index, modes):
    """SearchRecord for one sample, or None when a divergence is infinite (near-singular)."""
    rng = instance_rng(seed, index)
    rho, sigma, channel, description = random_faithful_instance(rng, modes)
    try:
        report = recovery_deficit(rho, sigma, channel, with_instance=True, validate=False)
    except NonFaithfulError:
        return None
    return SearchRecord(int(seed), int(index), report.deficit, report.d_in, report.d_out,
                        report.d_recovery, description, report.instance)


def scan_range(seed, modes, start, stop, top_k, threshold):
    """
    Evaluate samples [start, stop).
    Returns:
        (list, dict): the top_k records by (deficit, index) and the counters
        evaluated / near_singular / failed / found.
    A sample whose evaluation raises a library or LAPACK error counts as failed;
    any other exception propagates.
    """
    best = []
    stats = {"evaluated": 0, "near_singular": 0, "failed": 0, "found": 0}
    for index in range(start, stop):
        try:
            record = evaluate_sample(seed, index, modes)
        except (GaussianPetzError, linalg.LinAlgError):
            stats["failed"] += 1
            continue
        if record is None:
            stats["near_singular"] += 1
            continue
        stats["evaluated"] += 1
        if record.deficit < threshold:
            stats["found"] += 1
        best.append(record)
        if len(best) > 4 * max(top_k, 1):
            best = heapq.nsmallest(top_k, best, key=SearchRecord.sort_key)
    return heapq.nsmallest(top_k, best, key=SearchRecord.sort_key), stats


class SearchService:
    """
    Randomized search for negative recovery deficits. Every sample draws its
    instance from a generator seeded by (seed, index), so results do not
    depend on how the index range is split across workers.

    Workers run in a process pool by default (executor="thread" keeps them in
    this interpreter). Results come back to this process and go through the
    RecordBus before the merge.
    """

    def __init__(self, seed, samples, modes, threads=None, top_k=config.DEFAULT_TOP_K,
                 threshold=config.COUNTEREXAMPLE_THRESHOLD, colors=None, bus=None,
                 executor=config.SEARCH_EXECUTOR):
        if executor not in EXECUTORS:
            raise ConfigurationError(f"executor must be one of {sorted(EXECUTORS)}, got {executor!r}")
        self.seed = int(seed)
        self.samples = int(samples)
        self.modes = int(modes)
        self.threads = config.thread_count(threads)
        self.top_k = int(top_k)
        self.threshold = threshold
        self.colors = colors
        self.bus = bus or RecordBus()
        self.executor = executor

    def evaluate_sample(self, index):
        return evaluate_sample(self.seed, index, self.modes)

    def _report(self, worker_id, start, stop, records, stats):
        for record in records:
            self.bus.send(f"worker_{worker_id}", ("record", record))
        self.bus.send(f"worker_{worker_id}", ("stats", stats))
        msg = (f"worker {worker_id} finished samples [{start}, {stop}): "
               f"{stats['evaluated']} evaluated, {stats['found']} below threshold")
        if self.colors is not None:
            color = config.WORKER_COLORS[worker_id % len(config.WORKER_COLORS)]
            msg = f"{color}{msg}{self.colors.ENDC}"
        log_manager(msg, prefix="[SEARCH] ")

    def _worker(self, worker_id, start, stop):
        records, stats = scan_range(self.seed, self.modes, start, stop, self.top_k, self.threshold)
        self._report(worker_id, start, stop, records, stats)

    def _run_workers(self, chunks):
        if len(chunks) == 1:
            start, stop = chunks[0]
            try:
                self._worker(0, start, stop)
            except Exception as e:
                raise SearchAbortedError(
                    f"worker 0 stopped on samples [{start}, {stop}): {type(e).__name__}: {e}") from e
            return
        with EXECUTORS[self.executor](max_workers=len(chunks)) as pool:
            futures = {
                pool.submit(scan_range, self.seed, self.modes, start, stop, self.top_k, self.threshold):
                    (worker_id, start, stop)
                for worker_id, (start, stop) in enumerate(chunks)
            }
            for future in as_completed(futures):
                worker_id, start, stop = futures[future]
                try:
                    records, stats = future.result()
                except Exception as e:
                    for pending in futures:
                        pending.cancel()
                    raise SearchAbortedError(
                        f"worker {worker_id} stopped on samples [{start}, {stop}): {type(e).__name__}: {e}") from e
                self._report(worker_id, start, stop, records, stats)

    def run(self):
        """
        Returns:
            SearchResult: merged top-k and counters over every sample.
        Raises:
            SearchAbortedError: a worker did not finish its range.
        """
        chunks = _chunks(self.samples, self.threads)
        log_manager(f"Searching {self.samples} samples ({self.modes} mode(s), seed {self.seed}) "
                    f"on {len(chunks)} {self.executor} worker(s)", colors=self.colors, level="INFO",
                    prefix="[SEARCH] ")
        self._run_workers(chunks)
        silent = len(chunks) - len(self.bus.senders())
        if silent:
            raise SearchAbortedError(f"{silent} worker(s) finished without reporting")

        messages = self.bus.drain(key=lambda m: 0)
        totals = {"evaluated": 0, "near_singular": 0, "failed": 0, "found": 0}
        records = []
        for kind, payload in messages:
            if kind == "stats":
                for k in totals:
                    totals[k] += payload[k]
            else:
                records.append(payload)
        records = sorted(records, key=SearchRecord.sort_key)[:self.top_k]
        min_deficit = records[0].deficit if records else None
        if totals["near_singular"]:
            log_manager(f"{totals['near_singular']} near-singular sample(s) excluded",
                        colors=self.colors, level="WARNING", prefix="[SEARCH] ")
        if totals["failed"]:
            log_manager(f"{totals['failed']} sample(s) failed to evaluate and were skipped",
                        colors=self.colors, level="WARNING", prefix="[SEARCH] ")
        result = SearchResult(self.seed, self.samples, self.modes, totals["evaluated"],
                              totals["near_singular"], totals["failed"], totals["found"], min_deficit, records)
        level = "SUCCESS" if result.found else "WARNING"
        log_manager(f"{result.found} counterexample(s) with deficit < {self.threshold:g}; "
                    f"min deficit {min_deficit}", colors=self.colors, level=level, prefix="[SEARCH] ")
        return result
