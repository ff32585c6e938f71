"""
Report Codec Module

Lossless CSV encoding of error tables. The body holds one row per resolution;
a footer of ``# key=value`` lines carries the table kind and the observed
orders. Floats are written with ``repr`` so decoding returns the exact values,
and identical tables always encode to identical bytes.

    resolution,error,stderr,samples
    16.0,0.0387...,0.0011...,200
    ...
    # kind=space
    # orders=0.47...,0.49...,0.50...
    # order_stderrs=...
    # mean_order=0.49...
    # mean_order_stderr=...

Author: graded-spde-sdk developers
"""

from typing import Dict, List, Tuple

from .error_table import ErrorRow, ErrorTable
from .errors import ReportError, ValidationError

HEADER = ("resolution", "error", "stderr", "samples")
FOOTER_KEYS = ("kind", "orders", "order_stderrs", "mean_order", "mean_order_stderr")


def format_float(x: float) -> str:
    """Shortest round-tripping text of a float."""
    return repr(float(x))


class ErrorTableEncoder:
    """
    Encodes error tables into CSV text.
    """

    def encode(self, table: ErrorTable) -> str:
        """
        Encode a table.

        Args:
            table: The table to encode

        Returns:
            CSV text with a trailing newline
        """
        lines = [",".join(HEADER)]
        for row in table.rows:
            lines.append(",".join([format_float(row.resolution), format_float(row.error),
                                   format_float(row.stderr), str(int(row.samples))]))
        footer = {
            "kind": table.kind,
            "orders": ",".join(format_float(o) for o in table.orders),
            "order_stderrs": ",".join(format_float(s) for s in table.order_stderrs),
            "mean_order": format_float(table.mean_order),
            "mean_order_stderr": format_float(table.mean_order_stderr),
        }
        lines.extend(f"# {key}={footer[key]}" for key in FOOTER_KEYS)
        return "\n".join(lines) + "\n"


class ErrorTableDecoder:
    """
    Decodes CSV text back into error tables.
    """

    def decode(self, text: str) -> ErrorTable:
        """
        Decode a table.

        Args:
            text: Output of ErrorTableEncoder.encode

        Returns:
            The decoded ErrorTable

        Raises:
            ValidationError: when the text is not a well-formed table
        """
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines or tuple(lines[0].split(",")) != HEADER:
            raise ValidationError("Error table must start with the header "
                                  f"'{','.join(HEADER)}'.")
        rows: List[ErrorRow] = []
        footer: Dict[str, str] = {}
        for lineno, line in enumerate(lines[1:], start=2):
            if line.startswith("#"):
                key, sep, value = line[1:].strip().partition("=")
                if not sep:
                    raise ValidationError(f"Line {lineno}: malformed footer '{line}'.", index=lineno)
                footer[key.strip()] = value.strip()
                continue
            rows.append(self._row(line, lineno))
        missing = [key for key in FOOTER_KEYS if key not in footer]
        if missing:
            raise ValidationError(f"Error table footer lacks: {', '.join(missing)}.")
        return ErrorTable(
            kind=footer["kind"],
            rows=rows,
            orders=self._floats(footer["orders"]),
            order_stderrs=self._floats(footer["order_stderrs"]),
            mean_order=float(footer["mean_order"]),
            mean_order_stderr=float(footer["mean_order_stderr"]),
        )

    @staticmethod
    def _row(line: str, lineno: int) -> ErrorRow:
        parts = line.split(",")
        if len(parts) != len(HEADER):
            raise ValidationError(f"Line {lineno}: expected {len(HEADER)} fields, got {len(parts)}.",
                                  index=lineno)
        try:
            return ErrorRow(float(parts[0]), float(parts[1]), float(parts[2]), int(parts[3]))
        except ValueError:
            raise ValidationError(f"Line {lineno}: non-numeric field in '{line}'.", index=lineno)

    @staticmethod
    def _floats(text: str) -> List[float]:
        return [float(part) for part in text.split(",") if part]


class ErrorTableCodec:
    """
    Complete error-table codec with file access.
    """

    def __init__(self):
        self.encoder = ErrorTableEncoder()
        self.decoder = ErrorTableDecoder()

    def encode(self, table: ErrorTable) -> str:
        return self.encoder.encode(table)

    def decode(self, text: str) -> ErrorTable:
        return self.decoder.decode(text)

    def write(self, table: ErrorTable, path: str) -> None:
        """Write the encoded table to ``path``."""
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(self.encode(table))
        except OSError as exc:
            raise ReportError(f"Cannot write error table ({exc.strerror})", path)

    def read(self, path: str) -> ErrorTable:
        """Read and decode a table from ``path``."""
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return self.decode(fh.read())
        except OSError as exc:
            raise ReportError(f"Cannot read error table ({exc.strerror})", path)

    def round_trip(self, table: ErrorTable) -> Tuple[str, ErrorTable, bool]:
        """
        Encode then decode a table.

        Returns:
            (encoded, decoded, match)
        """
        encoded = self.encode(table)
        decoded = self.decode(encoded)
        return encoded, decoded, decoded == table
