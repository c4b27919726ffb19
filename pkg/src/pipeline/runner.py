"""
Исполнение графа с кэшированием: узлы с попаданием в кэш не исполняются,
независимые узлы одной волны могут исполняться параллельно.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional

from .cache import CacheStore, cache_key
from .graph import Graph, NodeExecutionError, NodeSpec, UnknownNodeKind, execution_waves, topo_order
from .nodes import REGISTRY, NodeKind


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NodeRun:
    """Запись журнала исполнения одного узла."""
    node_id: str
    kind: str
    key: str
    cached: bool
    output: Path


@dataclass
class RunResult:
    """
    Результат прогона графа.

    Attributes:
        order: Топологический порядок
        log: Журнал по узлам (попадание/промах кэша)
    """
    order: List[str]
    log: Dict[str, NodeRun] = field(default_factory=dict)

    @property
    def executed(self) -> List[str]:
        return [node_id for node_id in self.order if not self.log[node_id].cached]

    @property
    def cached(self) -> List[str]:
        return [node_id for node_id in self.order if self.log[node_id].cached]

    @property
    def outputs(self) -> Dict[str, Path]:
        return {node_id: run.output for node_id, run in self.log.items()}


def compute_keys(graph: Graph, registry: Mapping[str, NodeKind]) -> Dict[str, str]:
    """
    Ключи кэша всех узлов в топологическом порядке.

    Raises:
        UnknownNodeKind: Тип узла не зарегистрирован
        CycleDetected: Граф не ацикличен
    """
    keys: Dict[str, str] = {}
    for node_id in topo_order(graph):
        node = graph[node_id]
        kind = registry.get(node.kind)
        if kind is None:
            raise UnknownNodeKind(f"Узел '{node_id}': неизвестный тип '{node.kind}'")
        fingerprint = kind.fingerprint(node.params) if kind.fingerprint else None
        keys[node_id] = cache_key(node.kind, node.params, [keys[i] for i in node.inputs], fingerprint)
    return keys


def _execute(node: NodeSpec, kind: NodeKind, key: str, inputs: List[Path], cache: CacheStore) -> NodeRun:
    logger.debug(f"Узел '{node.node_id}' ({node.kind}): промах кэша, исполнение")
    try:
        entry = cache.publish(key, node.kind, node.params, lambda out: kind.run(node.params, inputs, out))
    except NodeExecutionError:
        raise
    except Exception as e:
        raise NodeExecutionError(node.node_id, e) from e
    return NodeRun(node.node_id, node.kind, key, cached=False, output=entry.path)


def run_graph(
    graph: Graph,
    cache: CacheStore,
    registry: Optional[Mapping[str, NodeKind]] = None,
    max_workers: int = 1,
) -> RunResult:
    """
    Исполняет граф.

    Args:
        graph: Граф узлов
        cache: Хранилище кэша
        registry: Типы узлов (по умолчанию встроенные)
        max_workers: Число потоков для узлов одной волны

    Returns:
        RunResult: Порядок, журнал попаданий/промахов и директории артефактов

    Raises:
        UnknownNodeKind, CycleDetected: Некорректный граф
        NodeExecutionError: Ошибка узла (node_id в исключении)
    """
    registry = registry if registry is not None else REGISTRY
    keys = compute_keys(graph, registry)
    result = RunResult(order=list(keys))

    def submit(node_id: str) -> NodeRun:
        node = graph[node_id]
        key = keys[node_id]
        entry = cache.lookup(key)
        if entry is not None:
            logger.debug(f"Узел '{node_id}' ({node.kind}): попадание в кэш {key[:12]}")
            return NodeRun(node_id, node.kind, key, cached=True, output=entry.path)
        inputs = [result.log[parent].output for parent in node.inputs]
        return _execute(node, registry[node.kind], key, inputs, cache)

    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
        for wave in execution_waves(graph):
            if max_workers > 1 and len(wave) > 1:
                runs = list(pool.map(submit, wave))
            else:
                runs = [submit(node_id) for node_id in wave]
            for run in runs:
                result.log[run.node_id] = run

    logger.info(
        f"Граф исполнен: узлов {len(result.order)}, исполнено {len(result.executed)}, "
        f"из кэша {len(result.cached)}"
    )
    return result
