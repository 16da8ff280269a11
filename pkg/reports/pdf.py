# reports/pdf.py
from typing import Any, Dict, List, Optional

from fpdf import FPDF


def create_pdf_report(data: Dict[str, Any], title: str, path: Optional[str] = None,
                      tables: Optional[Dict[str, List[Dict[str, Any]]]] = None) -> bytes:
    """
    One-page summary: ``key: value`` lines, then one block per table.

    Returns the PDF bytes; also writes them to ``path`` when given.
    """
    pdf = FPDF()
    pdf.add_page()
    pdf.set_font("Helvetica", "B", 16)
    pdf.cell(0, 10, title, ln=True)

    pdf.set_font("Helvetica", "", 11)
    for key, value in data.items():
        pdf.cell(0, 7, f"{key}: {value}", ln=True)

    for name, rows in (tables or {}).items():
        pdf.ln(4)
        pdf.set_font("Helvetica", "B", 12)
        pdf.cell(0, 8, name, ln=True)
        pdf.set_font("Helvetica", "", 9)
        for row in rows:
            pdf.cell(0, 5, "  ".join(f"{k}={v}" for k, v in row.items()), ln=True)

    out = pdf.output(dest="S")
    payload = out.encode("latin-1") if isinstance(out, str) else bytes(out)
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(payload)
    return payload
