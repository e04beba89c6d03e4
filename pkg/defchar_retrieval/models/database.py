import sqlite3
from pathlib import Path
from typing import Optional

from sqlalchemy import create_engine, event
from sqlalchemy.engine import Engine
from sqlalchemy.orm import DeclarativeBase, Session, sessionmaker

from defchar_retrieval.config import Config
from defchar_retrieval.utils.logger import setup_logger

logger = setup_logger(__name__)


class Base(DeclarativeBase):
    pass


@event.listens_for(Engine, "connect")
def set_sqlite_pragma(dbapi_connection, connection_record):
    """Enable foreign key constraints and optimize SQLite performance."""
    if isinstance(dbapi_connection, sqlite3.Connection):
        cursor = dbapi_connection.cursor()
        cursor.execute("PRAGMA foreign_keys=ON")
        cursor.execute("PRAGMA synchronous=NORMAL")
        cursor.execute("PRAGMA temp_store=MEMORY")
        cursor.close()


def init_db(db_url: Optional[str] = None) -> sessionmaker:
    """Create the results tables if needed and return a session factory."""
    db_url = db_url or Config.RESULTS_DB_URL
    if db_url.startswith('sqlite:///') and db_url != 'sqlite:///:memory:':
        db_dir = Path(db_url.replace('sqlite:///', '')).parent
        if not db_dir.exists():
            db_dir.mkdir(parents=True, exist_ok=True)
            logger.info(f"Created database directory: {db_dir}")

    engine = create_engine(db_url)
    Base.metadata.create_all(engine)
    return sessionmaker(bind=engine, expire_on_commit=False)


def open_session(db_url: Optional[str] = None) -> Session:
    return init_db(db_url)()
