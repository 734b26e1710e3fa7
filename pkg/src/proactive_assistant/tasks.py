"""Built-in task fixtures for replication sessions.

Four tasks, two per type: system building (storefront backend, to-do
list backend) and data analysis (sales figures, temperature trends).
Each fixture carries the instructions shown to the participant and the
starter code seeded into the session document.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigurationError

SYSTEM_BUILDING = "system_building"
DATA_ANALYSIS = "data_analysis"


@dataclass(frozen=True)
class TaskFixture:
    task_id: str
    name: str
    task_type: str
    instructions: str
    starter_code: str

    def to_payload(self) -> dict:
        return {
            "task_id": self.task_id,
            "name": self.name,
            "task_type": self.task_type,
            "instructions": self.instructions,
        }


_STOREFRONT_STARTER = '''\
class Store:
    """Backend for an online store. Orders and products are tracked by id."""

    def __init__(self, name):
        self.name = name
        self.products = {}   # product_id -> Product
        self.orders = {}     # order_id -> Order
        self.next_order_id = 1

    def add_product(self, product):
        self.products[product.product_id] = product

    def place_order(self, product_id, quantity):
        product = self.products[product_id]
        order = Order(self.next_order_id, product, quantity)
        self.orders[order.order_id] = order
        self.next_order_id += 1
        return order.order_id

    def total_revenue(self):
        return sum(order.total_price() for order in self.orders.values())
'''

_TODO_STARTER = '''\
from datetime import datetime


class Task:
    def __init__(self, description, category, priority, date_due=None):
        self.description = description
        self.category = category
        self.priority = priority  # "High", "Medium", or "Low"
        self.date_due = date_due
        self.completed = False

    def __str__(self):
        due = self.date_due.strftime("%Y-%m-%d") if self.date_due else "no due date"
        return f"[{self.priority}] {self.description} ({self.category}) due {due}"


class ToDoList:
    def __init__(self):
        self.tasks = []

    def add_task(self, description, category, priority, date_due=None):
        self.tasks.append(Task(description, category, priority, date_due))

    def complete_task(self, description):
        for task in self.tasks:
            if task.description == description:
                task.completed = True

    def edit_task(self, description, new_description):
        edited = []
        for task in self.tasks:
            if task.description == description:
                task = Task(new_description, task.category, task.priority, task.date_due)
            edited.append(task)
        self.tasks = edited

    def list_all(self):
        for task in self.tasks:
            print(task)
'''

_SALES_STARTER = '''\
import numpy as np

# Synthetic sales data: regions x months x stores x product sales figures.
rng = np.random.default_rng(7)
data = rng.integers(0, 500, size=(3, 12, 10, 100))


def total_sales_per_region(data):
    # TODO: total sales number for each region
    pass


def cumulative_sales(data):
    # TODO: cumulative sales over time per product, across regions and stores
    pass


def top_products_by_sales(data, k):
    # TODO: ids of the k best-selling products for each month
    pass


def temporal_correlation(data):
    # TODO: pairwise correlation of per-month sales between products
    pass
'''

_WEATHER_STARTER = '''\
import numpy as np

# One month of daily temperatures in Celsius (may contain extreme values).
rng = np.random.default_rng(11)
temps = rng.normal(loc=15.0, scale=12.0, size=30).round(1)


def classify_temps(data):
    # Incomplete: should label each day, e.g. "Freezing", "Moderate", "Hot".
    labels = []
    for t in data:
        if t < 0:
            labels.append("Freezing")
    return labels


def clip_temps(data):
    # TODO: clamp extreme values into the range [-10, 40]
    pass


def compute_moving_avg(data, window_size):
    # TODO: moving average over window_size days
    pass


def compute_weekly_avg(data):
    # TODO: average temperature per week
    pass
'''


BUILTIN_TASKS: tuple[TaskFixture, ...] = (
    TaskFixture(
        task_id="storefront",
        name="Storefront",
        task_type=SYSTEM_BUILDING,
        instructions=(
            "You are building the backend of an online store and have been handed "
            "starter code for the Store class.\n\n"
            "First, write the Product and Order classes so the existing Store code "
            "works. Then extend Store with apply_discount_to_order(self, order_id, "
            "discount) and check_order_status(self, order_id). Finally, add one more "
            "feature of your choice that a real store backend would want.\n\n"
            "Write test cases that demonstrate the store behaves as intended. Submit "
            "once, after finishing as many parts as you can."
        ),
        starter_code=_STOREFRONT_STARTER,
    ),
    TaskFixture(
        task_id="todo_list",
        name="To-do List",
        task_type=SYSTEM_BUILDING,
        instructions=(
            "You maintain the backend of a to-do list app; a colleague left you the "
            "code below. Tasks have a description, a category, a priority (High, "
            "Medium, or Low), and an optional due date.\n\n"
            "Fixes: mark overdue tasks by appending (OVERDUE) after the due date in "
            "__str__; reject new tasks whose due date is already in the past; there "
            "is also a bug somewhere in the code, find and fix it; and editing a task "
            "is inefficient, improve it.\n\n"
            "Features: give list_all a show_completed argument that hides finished "
            "tasks when False, and add list_by_priority(self) printing tasks from "
            "High to Low.\n\n"
            "Write test cases that demonstrate the list behaves as intended. Submit "
            "once, after finishing as many parts as you can."
        ),
        starter_code=_TODO_STARTER,
    ),
    TaskFixture(
        task_id="sales_analysis",
        name="Sales analysis",
        task_type=DATA_ANALYSIS,
        instructions=(
            "You are a data analyst at a global retailer looking at last year's "
            "product sales. The data is a 4-dimensional numpy array with shape "
            "(3, 12, 10, 100): axis 0 is regions, axis 1 is months, axis 2 is "
            "stores, axis 3 is per-product sales figures.\n\n"
            "Using only numpy, implement total_sales_per_region(data), "
            "cumulative_sales(data) (cumulative over time per product across all "
            "regions and stores), top_products_by_sales(data, k) (ids of the k "
            "best sellers per month across regions and stores), and "
            "temporal_correlation(data) (pairwise correlation of per-month sales "
            "between products).\n\n"
            "Write test cases that demonstrate the code works as intended. Submit "
            "once, after finishing as many parts as you can."
        ),
        starter_code=_SALES_STARTER,
    ),
    TaskFixture(
        task_id="weather_trends",
        name="Weather trends",
        task_type=DATA_ANALYSIS,
        instructions=(
            "You are a data analyst at a meteorological department studying one "
            "month of daily temperatures. The provided code is incomplete and may "
            "not be fully correct.\n\n"
            "Using only numpy, finish classify_temps(data) so each day gets a "
            "category label such as Freezing, Moderate, or Hot; write "
            "clip_temps(data) clamping extremes into [-10, 40]; write "
            "compute_moving_avg(data, window_size) for a moving average over the "
            "given window; and write compute_weekly_avg(data) for weekly averages.\n\n"
            "Write test cases that demonstrate the code works as intended. Submit "
            "once, after finishing as many parts as you can."
        ),
        starter_code=_WEATHER_STARTER,
    ),
)


class TaskRegistry:
    """Lookup of task fixtures; ships with the four built-ins."""

    def __init__(self, tasks: tuple[TaskFixture, ...] = BUILTIN_TASKS) -> None:
        self._tasks = {t.task_id: t for t in tasks}

    def get(self, task_id: str) -> TaskFixture:
        try:
            return self._tasks[task_id]
        except KeyError:
            known = ", ".join(sorted(self._tasks))
            raise ConfigurationError(f"unknown task {task_id!r} (known: {known})") from None

    def all(self) -> list[TaskFixture]:
        return list(self._tasks.values())

    def by_type(self, task_type: str) -> list[TaskFixture]:
        return [t for t in self._tasks.values() if t.task_type == task_type]
