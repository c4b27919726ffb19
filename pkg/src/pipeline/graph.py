"""
Граф узлов обработки: описание, загрузка/сохранение JSON и порядок исполнения.
"""

import heapq
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Set, Tuple, Union

from ..constants import Formats


logger = logging.getLogger(__name__)


class PipelineError(Exception):
    """Базовое исключение для пайплайна."""
    pass


class CycleDetected(PipelineError):
    """Граф содержит цикл."""

    def __init__(self, nodes: Iterable[str]):
        self.nodes = sorted(nodes)
        super().__init__(f"Цикл в графе среди узлов: {', '.join(self.nodes)}")


class UnknownNodeKind(PipelineError):
    """Тип узла не зарегистрирован."""
    pass


class TooManySources(PipelineError):
    """Перебор комбинаций для слишком большого числа источников."""
    pass


class MissingSource(PipelineError):
    """Источник треков не найден."""
    pass


class NodeExecutionError(PipelineError):
    """Ошибка исполнения узла, с идентификатором узла."""

    def __init__(self, node_id: str, cause: BaseException):
        self.node_id = node_id
        self.cause = cause
        super().__init__(f"Узел '{node_id}': {cause}")


@dataclass(frozen=True)
class NodeSpec:
    """
    Узел графа.

    Attributes:
        node_id: Уникальный идентификатор в графе
        kind: Зарегистрированный тип операции
        params: Параметры (JSON-сериализуемые)
        inputs: Идентификаторы входных узлов (порядок значим)
    """
    node_id: str
    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    inputs: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "params", dict(self.params))
        if not self.node_id:
            raise ValueError("node_id не может быть пустым")

    def with_params(self, **updates: Any) -> "NodeSpec":
        return NodeSpec(self.node_id, self.kind, {**self.params, **updates}, self.inputs)


@dataclass(frozen=True)
class Graph:
    """Граф узлов. Входы каждого узла должны существовать в графе."""
    nodes: Tuple[NodeSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        ids = [node.node_id for node in self.nodes]
        duplicates = {node_id for node_id in ids if ids.count(node_id) > 1}
        if duplicates:
            raise PipelineError(f"Повторяющиеся идентификаторы узлов: {sorted(duplicates)}")
        known = set(ids)
        for node in self.nodes:
            missing = [i for i in node.inputs if i not in known]
            if missing:
                raise PipelineError(f"Узел '{node.node_id}' ссылается на неизвестные входы {missing}")

    def __getitem__(self, node_id: str) -> NodeSpec:
        for node in self.nodes:
            if node.node_id == node_id:
                return node
        raise KeyError(node_id)

    def replace_node(self, node: NodeSpec) -> "Graph":
        return Graph(tuple(node if n.node_id == node.node_id else n for n in self.nodes))

    def children(self) -> Dict[str, List[str]]:
        result: Dict[str, List[str]] = {node.node_id: [] for node in self.nodes}
        for node in self.nodes:
            for parent in node.inputs:
                result[parent].append(node.node_id)
        return result

    def descendants(self, node_id: str) -> Set[str]:
        """Все узлы, зависящие от node_id (включая его самого)."""
        children = self.children()
        seen = {node_id}
        stack = [node_id]
        while stack:
            for child in children[stack.pop()]:
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return seen


def topo_order(graph: Graph) -> List[str]:
    """
    Топологический порядок (алгоритм Кана); из готовых узлов первым
    берётся наименьший node_id.

    Raises:
        CycleDetected: Граф не ацикличен
    """
    indegree = {node.node_id: len(set(node.inputs)) for node in graph.nodes}
    children = graph.children()
    ready = [node_id for node_id, degree in indegree.items() if degree == 0]
    heapq.heapify(ready)

    order: List[str] = []
    while ready:
        node_id = heapq.heappop(ready)
        order.append(node_id)
        for child in sorted(set(children[node_id])):
            indegree[child] -= 1
            if indegree[child] == 0:
                heapq.heappush(ready, child)

    if len(order) != len(graph.nodes):
        raise CycleDetected(node_id for node_id, degree in indegree.items() if degree > 0)
    return order


def execution_waves(graph: Graph) -> List[List[str]]:
    """
    Узлы по волнам: волна k зависит только от волн < k.

    Внутри волны - по node_id.
    """
    level: Dict[str, int] = {}
    for node_id in topo_order(graph):
        parents = graph[node_id].inputs
        level[node_id] = max((level[p] + 1 for p in parents), default=0)
    waves: List[List[str]] = [[] for _ in range(max(level.values(), default=-1) + 1)]
    for node_id in sorted(level):
        waves[level[node_id]].append(node_id)
    return waves


def graph_from_dict(document: Mapping[str, Any]) -> Graph:
    """
    Граф из JSON-документа {"version": 1, "nodes": [{"id", "kind", "params", "inputs"}]}.

    Raises:
        PipelineError: Неподдерживаемая версия или некорректный узел
    """
    version = document.get("version")
    if version != Formats.GRAPH_SCHEMA_VERSION:
        raise PipelineError(f"Неподдерживаемая версия графа: {version}")
    nodes = []
    for index, item in enumerate(document.get("nodes", [])):
        try:
            nodes.append(NodeSpec(
                node_id=str(item["id"]),
                kind=str(item["kind"]),
                params=item.get("params", {}),
                inputs=tuple(str(i) for i in item.get("inputs", [])),
            ))
        except (KeyError, TypeError, ValueError) as e:
            raise PipelineError(f"Некорректный узел /nodes/{index}: {e}") from e
    return Graph(tuple(nodes))


def graph_to_dict(graph: Graph) -> Dict[str, Any]:
    return {
        "version": Formats.GRAPH_SCHEMA_VERSION,
        "nodes": [
            {"id": node.node_id, "kind": node.kind, "params": dict(node.params), "inputs": list(node.inputs)}
            for node in graph.nodes
        ],
    }


def load_graph(path: Union[str, Path]) -> Graph:
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise PipelineError(f"Не удалось прочитать граф {path}: {e}") from e
    graph = graph_from_dict(document)
    logger.debug(f"Граф {path}: узлов {len(graph.nodes)}")
    return graph


def dump_graph(graph: Graph, path: Union[str, Path]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(graph_to_dict(graph), f, indent=2, ensure_ascii=False)
        f.write("\n")
