# gaussian_petz/utils/record_bus.py
import threading


class RecordBus:
    """Collects (sender, record) messages from search workers. Arrival order is irrelevant; drain() sorts."""

    def __init__(self):
        self.records = []
        self.lock = threading.Lock()

    def send(self, sender, record):
        with self.lock:
            self.records.append((sender, record))

    def senders(self):
        with self.lock:
            return sorted({sender for sender, _ in self.records})

    def drain(self, key):
        """Return all records sorted by key(record) and clear the bus."""
        with self.lock:
            records = [record for _, record in self.records]
            self.records = []
        return sorted(records, key=key)
