# models.py
"""SQLAlchemy models for the run ledger.

A :class:`Run` records one CLI invocation with its resolved configuration;
every :class:`PropertyReportRecord` belongs to a run.  The ledger is optional
and only written when ``--db-url`` is given.
"""

import uuid
from datetime import datetime
from typing import Iterable, Optional

from sqlalchemy import (
    JSON,
    Boolean,
    Column,
    DateTime,
    Enum,
    Float,
    ForeignKey,
    Index,
    Integer,
    String,
    Text,
    create_engine,
)
from sqlalchemy.dialects.postgresql import UUID
from sqlalchemy.orm import Session, declarative_base, relationship, sessionmaker

Base = declarative_base()


def generate_uuid():
    """Generate UUID objects compatible with SQLAlchemy's UUID type."""
    return uuid.uuid4()


class Run(Base):
    __tablename__ = "runs"
    id = Column(UUID(as_uuid=True), primary_key=True, default=generate_uuid)
    command = Column(Enum("kernel", "maximal", "verify", "continuity", "bruteforce", name="run_command"))
    kernel = Column(String(50))
    suite = Column(String(30), nullable=True)
    seed = Column(Integer)
    tol = Column(Float)
    config = Column(JSON)
    out_dir = Column(Text)
    exit_code = Column(Integer, nullable=True)
    started_at = Column(DateTime, default=datetime.utcnow)
    finished_at = Column(DateTime, nullable=True)
    reports = relationship("PropertyReportRecord", back_populates="run")


class PropertyReportRecord(Base):
    __tablename__ = "property_reports"
    __table_args__ = (Index("ix_property_reports_run_name", "run_id", "name"),)
    id = Column(UUID(as_uuid=True), primary_key=True, default=generate_uuid)
    run_id = Column(UUID(as_uuid=True), ForeignKey("runs.id"))
    function_id = Column(String(80))
    kernel = Column(String(50))
    name = Column(String(80), nullable=False)
    status = Column(
        Enum("passed", "failed", "inconclusive", "not_applicable", "recorded", name="report_status"),
        default="passed",
    )
    passed = Column(Boolean, default=True)
    lhs = Column(Float)
    rhs = Column(Float)
    slack = Column(Float)
    witnesses = Column(JSON)
    report_path = Column(Text, nullable=True)
    created_at = Column(DateTime, default=datetime.utcnow)
    run = relationship("Run", back_populates="reports")


def open_ledger(db_url: str) -> Session:
    """Create tables if missing and return a session."""
    engine = create_engine(db_url)
    Base.metadata.create_all(engine)
    return sessionmaker(bind=engine)()


def _finite(x: float) -> Optional[float]:
    return x if x == x and abs(x) != float("inf") else None


def record_reports(session: Session, run: Run, results: Iterable, paths: Optional[dict] = None) -> int:
    """Add one row per suite result; returns the count."""
    n = 0
    for r in results:
        rep = r.report
        session.add(
            PropertyReportRecord(
                run=run,
                function_id=r.function_id,
                kernel=r.kernel,
                name=rep.name,
                status=rep.status,
                passed=rep.passed,
                lhs=_finite(rep.lhs),
                rhs=_finite(rep.rhs),
                slack=_finite(rep.slack),
                witnesses=rep.to_dict()["witnesses"],
                report_path=(paths or {}).get(r.key),
            )
        )
        n += 1
    return n
