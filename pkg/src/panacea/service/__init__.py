from .config import CONFIG_ENV_VAR, ServiceConfig, load_config
from .engine import PanaceaEngine, autocomplete, build_engine, build_indexes
from .httpd import PanaceaServer, api_serve, create_server, serve_in_thread
from .jobs import (
    CacheEntry,
    Job,
    JobKind,
    JobService,
    JobState,
    PrecomputedStore,
    ResourcePool,
    ResultCache,
)

__all__ = [
    "CONFIG_ENV_VAR", "ServiceConfig", "load_config",
    "PanaceaEngine", "autocomplete", "build_engine", "build_indexes",
    "PanaceaServer", "api_serve", "create_server", "serve_in_thread",
    "CacheEntry", "Job", "JobKind", "JobService", "JobState",
    "PrecomputedStore", "ResourcePool", "ResultCache",
]
